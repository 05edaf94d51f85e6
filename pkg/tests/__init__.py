"""Test suite for nicmap."""
