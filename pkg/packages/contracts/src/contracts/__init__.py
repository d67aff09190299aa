from .graph_input_v1 import EdgeSpec, EllipseBoundary, GraphInputV1, NodeSpec, PolygonBoundary, RectangleBoundary
from .order_instance_v1 import OrderInstanceV1, OrderNode, OrderPath
from .bundle_result_v1 import (
    BundleResultV1,
    BundleStatsV1,
    CostBreakdown,
    GraphSizes,
    OrderingReportV1,
    RouteRecord,
    StageTimings,
)

__all__ = [
    "GraphInputV1",
    "NodeSpec",
    "EdgeSpec",
    "RectangleBoundary",
    "EllipseBoundary",
    "PolygonBoundary",
    "OrderInstanceV1",
    "OrderNode",
    "OrderPath",
    "BundleResultV1",
    "BundleStatsV1",
    "CostBreakdown",
    "GraphSizes",
    "StageTimings",
    "RouteRecord",
    "OrderingReportV1",
]
