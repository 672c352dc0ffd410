"""Spectra of discrete Schrodinger operators with Sturmian potentials.

The rotation angle ``alpha`` is given by an eventually periodic continued
fraction such as ``"[0;(1)]"`` (the golden mean) or ``"[0;2,(1,3)]"``.

>>> from sturmspec import parse_cf, ModelParams, bands
>>> len(bands(ModelParams(1.0, parse_cf("[0;(1)]")), 10))
89
"""

from .numberth import (
    Approximant,
    CFParseError,
    ContinuedFraction,
    QuadraticIrrational,
    approximants,
    cf_value,
    format_cf,
    parse_cf,
    quadratic_irrational,
)
from .tracemap import ModelParams, TracePoint, fricke_vogt, orbit_point, trace_orbit, trace_step
from .words import cmps_substitution, rotation_sequence, rotation_slope, sturmian_word_by_recursion
from .spectrum import (
    Band,
    BandCountError,
    BandSet,
    Gap,
    ThicknessReport,
    bands,
    box_dimension,
    gap_opening_study,
    gaps_from_bands,
    spectrum_cover,
    thickness_denseness,
)
from .ids import (
    DirichletOperator,
    IDSTable,
    count_below,
    dos_local_dimension,
    free_ids,
    gap_labels,
    ids_curve,
    match_gaps_to_labels,
    potential,
)

__version__ = "0.1.0"
