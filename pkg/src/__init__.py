"""Reduced models for transport-dominated conservation laws."""
