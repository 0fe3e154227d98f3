"""Data-path discovery for switch-based data-planes.

Model a topology and its flow rules, inject simulated probe packets,
and reconstruct the paths the packets actually took from per-interface
observations, flagging forwarding loops and disconnected paths.
"""

from .topology import (
    DataPlane,
    Link,
    TopologyError,
    UnknownInterfaceError,
    ValidationReport,
    example_plane,
    parse_topology,
    serialize_topology,
    validate,
)
from .headers import (
    DEFAULT_SCHEMA,
    HeaderSchema,
    HeaderValue,
    TrafficType,
    enumerate_headers,
    free_bit_count,
    header_from_fields,
    indicator_eval,
    match_all,
    parse_filter,
)
from .forwarding import (
    DROP,
    DataPlaneConfig,
    FlowRule,
    Match,
    RuleTable,
    empty_config,
    flood_config,
    install,
    lookup,
    parse_rules,
    serialize_rules,
)
from .observations import Observation, ObservationLog, group_by_uid, parse_log, serialize_log
from .simulate import GroundTruth, Probe, SimResult, ground_truth_paths, hop_cutoff, simulate
from .analyzer import (
    AnalysisError,
    DisconnectedError,
    FlowTree,
    FlowTreeNode,
    LoopError,
    build_flow_tree,
    extract_paths,
    render_tree,
    tree_from_dict,
    tree_to_dict,
)
from .testgen import TestCase, TestSuite, bounds, suite_for_header, suite_for_type, suite_size_for_type
from .service import DiscoveryRequest, DiscoveryResult, create_app, discover, ingest_log

__version__ = "0.1.0"
