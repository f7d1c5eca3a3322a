"""Biased Client-Waiter and Waiter-Client games on graph boards."""
