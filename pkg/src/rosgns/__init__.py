"""SGNS word embeddings via Riemannian optimization on the fixed-rank manifold."""
