# Geometry Engine Package
