"""Cycle-rooted spanning forests: exact enumeration, generalized Wilson sampling, and statistics."""
