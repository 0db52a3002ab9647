"""Open linked carbon footprint scenarios: schema, resolution, and
emission computation, with a CLI and an HTTP service on top."""

from cfs.engine import (
    BenchmarkResult,
    EmissionReport,
    apply_edit,
    benchmark,
    compute,
    compute_component,
)
from cfs.resolver import ResolvedScenario, Resolver, ResolverConfig, resolve, resolve_inline
from cfs.schema import (
    Component,
    Consumer,
    Consumption,
    EmissionFactor,
    Link,
    Scenario,
    ScenarioUri,
    ScopeBlock,
    ScopeLevel,
    Source,
    canonical_json,
    parse_scenario,
    serialize_scenario,
    validate,
)
from cfs.share import decode_scenario, encode_scenario
from cfs.units import DEFAULT_REGISTRY, UnitRegistry, convert, dimension_of

__version__ = "0.1.0"
