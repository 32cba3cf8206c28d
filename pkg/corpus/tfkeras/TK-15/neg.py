import os

from tensorflow import keras

os.environ["CUDA_HOME"] = "/usr/local/cuda-11.2"
os.environ["LD_LIBRARY_PATH"] = "/usr/local/cuda-11.2/lib64"

model = keras.models.load_model("m.h5")
