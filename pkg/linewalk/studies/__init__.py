# Study commands, one module per CLI command
