"""Command-line front end: ``hconv families | verify | reproduce | plot``."""
