"""Exact spectral sequences of filtered integer cochain complexes.

Integer linear algebra (:mod:`zlinalg`), complexes and filtrations
(:mod:`complexes`), cosimplicial objects and their totalizations
(:mod:`cosimplicial`), spectral sequences (:mod:`specseq`) and Deligne's
décalage (:mod:`decalage`).
"""

__version__ = "0.1.0"
