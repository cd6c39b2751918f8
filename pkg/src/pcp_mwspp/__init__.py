"""Desk-scale reduction from 3SAT to minimum weight solution with pre-processing.

Stages: GF(2^r) arithmetic (:mod:`.field`), polynomials (:mod:`.poly`),
quadratic systems (:mod:`.qcsp`), the PCP (:mod:`.pcp`, :mod:`.sumcheck`),
hyper label cover (:mod:`.hlcpp`), the MWSPP/NCP encoding (:mod:`.mwspp`)
and the command line tools (:mod:`.cli`, :mod:`.pipeline`, :mod:`.params`).
"""

__version__ = "0.1.0"
