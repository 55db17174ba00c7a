"""Evaluation metrics, comparison tables and plots."""
