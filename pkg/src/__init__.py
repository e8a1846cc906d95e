"""Quantized network counting toolkit."""
