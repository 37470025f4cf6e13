"""Acceptance checks for the verify-all command."""
