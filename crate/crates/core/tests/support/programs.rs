//! Hand-written programs in the style of model-generated test snippets.

use evofuzz_core::corpus::{ApiTarget, Library, Provenance, TestProgram};

pub struct Fixture {
    pub api: &'static str,
    pub source: &'static str,
}

pub const FIXTURES: &[Fixture] = &[
    Fixture { api: "torch.abs", source: "import torch\nx = torch.rand(3)\ny = torch.abs(x)\n" },
    Fixture {
        api: "torch.matmul",
        source: "import torch\na = torch.randn(2, 3)\nb = torch.randn(3, 4)\nc = torch.matmul(a, b)\nd = c.sum(dim=0)\n",
    },
    Fixture {
        api: "torch.nn.functional.relu",
        source: "import torch\nimport torch.nn.functional as F\nx = torch.randn(4, 4)\ny = F.relu(x, inplace=False)\n",
    },
    Fixture {
        api: "torch.log",
        source: "import torch\na = torch.rand(3)\nb = torch.log(a)\nc = torch.matrix_exp(b)\n",
    },
    Fixture {
        api: "torch.cat",
        source: "import torch\nxs = [torch.ones(2), torch.zeros(2)]\nout = torch.cat(xs, dim=0)  # join\n",
    },
    Fixture {
        api: "torch.sum",
        source: "import torch\nx = torch.arange(6).reshape(2, 3)\nfor d in range(2):\n    s = torch.sum(x, dim=d)\n    t = s * 2\n",
    },
    Fixture {
        api: "torch.clamp",
        source: "import torch\nx = torch.randn(5)\nif x.mean() > 0:\n    y = torch.clamp(x, min=0.0)\nelse:\n    y = torch.clamp(x, max=0.0)\nz = y + 1\n",
    },
    Fixture {
        api: "torch.mm",
        source: "import torch\nb = torch.rand(2, 2)\nout = torch.mm( torch.rand(2, 2) , b )\n",
    },
    Fixture {
        api: "torch.sort",
        source: "import torch\n\nx = torch.tensor([3.0, 1.0, 2.0])\n\nvalues, indices = torch.sort(x, descending=True)\nfirst = values[0]\n",
    },
    Fixture {
        api: "torch.where",
        source: "import torch\nx = torch.randn(3, 3)\ny = torch.zeros(3, 3)\nz = torch.where(\n    x > 0,\n    x,\n    y,\n)\n",
    },
    Fixture {
        api: "torch.exp",
        source: "import torch\ndef f(t):\n    return t * 2\nx = torch.rand(4)\ny = torch.exp(f(x))\n",
    },
    Fixture {
        api: "torch.max",
        source: "import torch\nx = torch.rand(3, 4)\nwith torch.no_grad():\n    m = torch.max(x, 1)\n    n = torch.max(x)\n",
    },
    Fixture {
        api: "torch.nn.Conv2d",
        source: "import torch\nconv = torch.nn.Conv2d(3, 8, kernel_size=3, stride=1)\nx = torch.randn(1, 3, 8, 8)\ny = conv(x)\n",
    },
    Fixture {
        api: "torch.linalg.inv",
        source: "import torch\ntry:\n    a = torch.eye(3)\n    b = torch.linalg.inv(a)\nexcept RuntimeError:\n    b = None\n",
    },
    Fixture {
        api: "torch.flip",
        source: "import torch\nx = torch.arange(8).view(2, 2, 2)\ny = torch.flip(x, [0, 1])\nz = y.flatten()\nw = z.tolist()\n",
    },
    Fixture {
        api: "torch.stack",
        source: "import torch\nts = [torch.full((2,), float(i)) for i in range(3)]\ns = torch.stack(ts)\n",
    },
    Fixture {
        api: "torch.topk",
        source: "import torch\nx = torch.randn(10)\nk = 3\nvals = torch.topk(x, k).values\n",
    },
    Fixture {
        api: "torch.nn.functional.softmax",
        source: "import torch\nfrom torch.nn import functional as F\nlogits = torch.randn(2, 5)\np = F.softmax(logits, dim=-1)\nq = torch.log(p)\n",
    },
    Fixture {
        api: "torch.bitwise_right_shift",
        source: "import torch\na = torch.tensor([-8, 16], dtype=torch.int64)\nb = torch.tensor([70, 2])\nc = torch.bitwise_right_shift(a, b)\n",
    },
    Fixture {
        api: "tf.nn.conv2d",
        source: "import tensorflow as tf\nx = tf.random.normal([1, 5, 5, 1])\nw = tf.random.normal([3, 3, 1, 2])\ny = tf.nn.conv2d(x, w, strides=1, padding='SAME')\n",
    },
    Fixture {
        api: "tf.math.log",
        source: "import tensorflow as tf\nx = tf.constant([1.0, 2.0, 0.5])\ny = tf.math.log(x)\nz = tf.reduce_sum(y)\n",
    },
    Fixture {
        api: "tf.reshape",
        source: "import tensorflow as tf\nt = tf.range(12)\nr = tf.reshape(t, [3, 4])\ns = tf.transpose(r)\n",
    },
    Fixture {
        api: "tf.data.Dataset.range",
        source: "import tensorflow as tf\nds = tf.data.Dataset.range(10)\nds = ds.batch(5)\nfor b in ds:\n    total = tf.reduce_sum(b)\n",
    },
    Fixture {
        api: "tf.matmul",
        source: "import tensorflow as tf\n\n# two matrices\na = tf.ones([2, 3])\nb = tf.ones([3, 2])\nc = tf.matmul(a, b,\n              transpose_a=False)\n",
    },
    Fixture {
        api: "tf.image.crop_and_resize",
        source: "import tensorflow as tf\nimage = tf.random.uniform([1, 8, 8, 3])\nboxes = tf.constant([[0.0, 0.0, 1.0, 1.0]])\nidx = tf.constant([0])\nout = tf.image.crop_and_resize(image, boxes, idx, [4, 4])\n",
    },
    Fixture {
        api: "tf.concat",
        source: "import tensorflow as tf\nparts = []\nfor i in range(3):\n    parts.append(tf.fill([2], i))\njoined = tf.concat(parts, axis=0)\n",
    },
    Fixture {
        api: "tf.nn.relu",
        source: "import tensorflow as tf\nx = tf.constant([-1.0, 2.0])\nwhile True:\n    y = tf.nn.relu(x)\n    break\n",
    },
    Fixture {
        api: "tf.math.reduce_max",
        source: "import tensorflow as tf\nx = tf.random.normal([4, 4])\nm = tf.math.reduce_max(x, axis=1, keepdims=True)\nn = x - m\n",
    },
    Fixture {
        api: "tf.cast",
        source: "import tensorflow as tf\nx = tf.constant([1.7, -2.2])\ny = tf.cast(x, tf.int32)\nz = tf.cast(y, tf.float32)\nw = tf.abs(z)\n",
    },
    Fixture {
        api: "tf.linalg.matvec",
        source: "import tensorflow as tf\nclass M:\n    scale = 2.0\na = tf.eye(2) * M.scale\nv = tf.constant([1.0, 1.0])\nr = tf.linalg.matvec(a, v)\n",
    },
    Fixture {
        api: "torch.nn.functional.pad",
        source: "import torch\nimport torch.nn.functional as F\nx = torch.ones(1, 1, 2, 2)\nif True: y = F.pad(x, (1, 1), mode='constant', value=0.0)\nz = y.shape\n",
    },
    Fixture {
        api: "torch.einsum",
        source: "import torch\na = torch.rand(2, 3)\nb = torch.rand(3)\nc = torch.einsum('ij,j->i', a, b)\nd = torch.einsum('i->', c)\n",
    },
];

pub fn library_of(api: &str) -> Library {
    if api.starts_with("tf.") {
        Library::TensorflowLike
    } else {
        Library::TorchLike
    }
}

pub fn program(f: &Fixture) -> TestProgram {
    let target = ApiTarget::new(library_of(f.api), f.api, "").expect("fixture API names are valid");
    TestProgram::new(f.source, target, Provenance::Seed)
}
