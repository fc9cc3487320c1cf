# gammanoise source tree
