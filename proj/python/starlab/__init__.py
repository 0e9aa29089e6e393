"""LEO constellation topology laboratory: Python interface to the C++ core."""

from starlab._core import (  # noqa: F401
    DemandMatrix,
    Ephemeris,
    GroundStation,
    RangeGraph,
    ShellConfig,
    StarfieldParams,
    Topology,
    build_demand,
    generate_shell,
    load_stations_csv,
    max_isl_range,
    motivating_example,
    perturb_demand,
    plus_grid,
    random_topology,
    range_graph,
    regional_resultant_length,
    simulate,
    starfield,
    static_starfield,
    stretch_summary,
)

__all__ = [
    "DemandMatrix",
    "Ephemeris",
    "GroundStation",
    "RangeGraph",
    "ShellConfig",
    "StarfieldParams",
    "Topology",
    "build_demand",
    "generate_shell",
    "load_stations_csv",
    "max_isl_range",
    "motivating_example",
    "perturb_demand",
    "plus_grid",
    "random_topology",
    "range_graph",
    "regional_resultant_length",
    "simulate",
    "starfield",
    "static_starfield",
    "stretch_summary",
]
