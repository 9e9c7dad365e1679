# anchors the pytest rootdir so `import oracles` resolves from this directory
