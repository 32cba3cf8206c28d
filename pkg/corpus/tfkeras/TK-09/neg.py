import tensorflow as tf

total = tf.constant(0.0)
for i in range(10):
    total = total + tf.cast(i, tf.float32)
