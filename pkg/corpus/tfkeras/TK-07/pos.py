import tensorflow as tf

op = tf.constant(1)
sess = tf.compat.v1.Session()  # expect[TK-07]
result = sess.run(op)
print(result)
