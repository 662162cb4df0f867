"""Extraction adapter: encoder hidden states to word-aligned LDEB files.

Deliberately independent of the analysis toolkit: it talks to it only
through the LDEB file format and CoNLL-U inputs.
"""

__version__ = "0.1.0"

from .runner import ExtractionJob, extract
from .ldeb import validate_ldeb, write_ldeb

__all__ = ["ExtractionJob", "extract", "validate_ldeb", "write_ldeb"]
