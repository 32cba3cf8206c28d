import tensorflow as tf

model = tf.keras.models.load_model("m.h5")
data = tf.zeros((8192, 16))
labels = tf.zeros((8192, 1))
model.fit(data, labels, batch_size=4096)  # expect[TK-14]
