# Metallic structure verification package
