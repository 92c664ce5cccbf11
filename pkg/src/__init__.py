# Congruence verification engine
