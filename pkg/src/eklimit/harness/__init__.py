"""Command line harness: configuration, experiment drivers and report writers."""
