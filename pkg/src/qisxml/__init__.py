"""QIS-XML: document model and toolchain for quantum gates, circuits and programs."""

__version__ = "0.1.0"
