# Text and structured renderers
