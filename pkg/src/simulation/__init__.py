"""Synthetic learners, the latent memory environment and the review loop."""
