"""Local-field gamma factors, beta integrals and the local Selberg integral."""
