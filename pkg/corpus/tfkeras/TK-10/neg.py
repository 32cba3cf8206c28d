import tensorflow as tf

table = tf.constant([1, 2, 3])
