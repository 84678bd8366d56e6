# Sketch types: graphs, presentations, cones, realizations and models
