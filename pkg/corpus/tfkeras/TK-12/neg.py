import tensorflow as tf

a = tf.zeros((3, 4))
b = tf.ones((3, 4))
c = a + b
