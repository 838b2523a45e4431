"""Configuration, registry, persistence and the ``weakpaths`` command line."""
