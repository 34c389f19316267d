"""Cardinal functions of convergent series of positive rationals."""

from ._core import (
    Cardinality,
    CardfnError,
    CountResult,
    Series,
    add_m_double_totals,
    add_m_totals,
    add_total,
    add_two_totals,
    classify,
    convergence_profile,
    count,
    cover,
    double_terms,
    enumerate,
    finite_range,
    gaps,
    interleave,
    omega_witness,
    prepend_scaled,
    preset_names,
    product,
    range_scan,
    search_finite_ranges,
    unique_base,
)

__all__ = [
    "Cardinality",
    "CardfnError",
    "CountResult",
    "Series",
    "add_m_double_totals",
    "add_m_totals",
    "add_total",
    "add_two_totals",
    "classify",
    "convergence_profile",
    "count",
    "cover",
    "double_terms",
    "enumerate",
    "finite_range",
    "gaps",
    "interleave",
    "omega_witness",
    "prepend_scaled",
    "preset_names",
    "product",
    "range_scan",
    "search_finite_ranges",
    "unique_base",
]
