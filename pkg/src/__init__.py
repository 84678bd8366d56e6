# Limit Sketch Toolkit
# Finitely presented limit sketches and their universal realizations
