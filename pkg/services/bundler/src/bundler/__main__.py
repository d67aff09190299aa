"""Allow running the bundler as: python -m bundler ..."""
from .cli import main

main()
