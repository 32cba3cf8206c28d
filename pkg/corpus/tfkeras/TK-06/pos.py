import tensorflow as tf

a = tf.ones((4, 4))
for step in range(100):
    a = tf.matmul(a, a)  # expect[TK-06]
