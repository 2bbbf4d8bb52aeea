"""HTTP wrapper around the experiment harness."""
