"""Graph covers of multigraphs with semi-edges."""
