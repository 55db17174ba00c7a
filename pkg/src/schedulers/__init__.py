"""LECTOR and the six baseline schedulers behind one interface."""
