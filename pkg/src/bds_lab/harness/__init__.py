"""Experiment harness: verification suites, sweeps, reports and the CLI plumbing."""
