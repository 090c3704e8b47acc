# Tests package for the metallic verification harness
