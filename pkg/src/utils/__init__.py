# Utilities Package
# Expression language for frame components and conformal factors
