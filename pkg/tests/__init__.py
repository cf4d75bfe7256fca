"""Test suite for the multigraph extremal laboratory."""
