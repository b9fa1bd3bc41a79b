"""Normal tilings of 2D manifolds as half-edge meshes, with corner-degree statistics."""
