"""EEG pain-state classification: offline training/evaluation pipeline and
a realtime streaming monitor."""

__version__ = "0.1.0"
