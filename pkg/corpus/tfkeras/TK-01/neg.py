import tensorflow as tf

rows = []
for path in ["a.csv", "b.csv"]:
    with open(path) as handle:
        rows.append(handle.read())
