import tensorflow as tf


def heavy_branch(x):
    y = tf.abs(x)
    z = tf.sign(x)
    return tf.minimum(tf.maximum(y, z), x)


layer = tf.keras.layers.Lambda(heavy_branch)  # expect[TK-03]
