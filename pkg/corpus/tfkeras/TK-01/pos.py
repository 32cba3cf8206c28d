import tensorflow as tf

rows = []
for path in ["a.csv", "b.csv"]:
    handle = open(path)  # expect[TK-01]
    rows.append(handle.read())
