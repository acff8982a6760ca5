"""advsem: targeted transfer attacks on image classifiers, evaluated by
semantic mismatch instead of label mismatch."""

__version__ = "0.1.0"
