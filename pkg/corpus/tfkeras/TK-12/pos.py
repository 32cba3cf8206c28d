import tensorflow as tf

a = tf.zeros((3, 4))
b = tf.ones((3, 4, 1))
c = a + b  # expect[TK-12]
