import tensorflow as tf

op = tf.constant(1)
with tf.compat.v1.Session() as sess:
    result = sess.run(op)
    print(result)
