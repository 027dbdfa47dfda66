import * as path from 'node:path'
import { fileURLToPath } from 'node:url'
import * as tf from '@tensorflow/tfjs'
import { describe, expect, it } from 'vitest'

import { forward, forwardWithTangent } from '../src/compute.js'
import { fileHandler, loadModelIR } from '../src/model.js'
import { NdArr, fromArray, sizeOf } from '../src/ndarray.js'

const fixtures = path.join(path.dirname(fileURLToPath(import.meta.url)), '..', 'fixtures')

function seededInput(shape: number[], scale = 1): NdArr {
  // fixed pseudo-random pattern, no dependence on Math.random
  const n = sizeOf(shape)
  const values = Array.from({ length: n }, (_, i) => scale * Math.sin(3.7 * i + 0.3))
  return fromArray(shape, values)
}

function maxAbsDiff(a: ArrayLike<number>, b: ArrayLike<number>): number {
  let worst = 0
  for (let i = 0; i < a.length; i++) worst = Math.max(worst, Math.abs(a[i] - b[i]))
  return worst
}

describe('forward', () => {
  it('matches the framework forward pass on the cnn (float32 route)', async () => {
    const dir = path.join(fixtures, 'small-cnn')
    const ir = await loadModelIR(dir)
    const input = seededInput([6, 6, 1])
    const ours = forward(ir, input)

    const model = await tf.loadLayersModel(fileHandler(dir))
    const theirs = tf.tidy(() => {
      const x = tf.tensor4d(Float32Array.from(input.data), [1, 6, 6, 1])
      return (model.predict(x) as tf.Tensor).dataSync()
    })
    model.dispose()
    expect(ours.shape).toEqual([2])
    expect(maxAbsDiff(ours.data, theirs)).toBeLessThan(1e-4)
  })

  it('matches the framework on every intermediate layer', async () => {
    const dir = path.join(fixtures, 'small-cnn')
    const ir = await loadModelIR(dir)
    const input = seededInput([6, 6, 1])
    const outputs = forwardWithTangent(ir, input, null)

    const model = await tf.loadLayersModel(fileHandler(dir))
    for (const layer of ir.layers) {
      const sub = tf.model({
        inputs: model.inputs,
        outputs: model.getLayer(layer.name).output as tf.SymbolicTensor,
      })
      const theirs = tf.tidy(() => {
        const x = tf.tensor4d(Float32Array.from(input.data), [1, 6, 6, 1])
        return (sub.predict(x) as tf.Tensor).dataSync()
      })
      const ours = outputs.get(layer.name)!.value
      expect(maxAbsDiff(ours.data, theirs)).toBeLessThan(1e-4)
    }
    model.dispose()
  })
})

describe('forwardWithTangent', () => {
  it('tangent matches a central finite difference through the cnn', async () => {
    const ir = await loadModelIR(path.join(fixtures, 'small-cnn'))
    const x = seededInput([6, 6, 1])
    const v = seededInput([6, 6, 1], 0.6)
    const jvp = forwardWithTangent(ir, x, v)

    const h = 1e-5
    const bump = (sign: number): NdArr => ({
      shape: [...x.shape],
      data: x.data.map((value, i) => value + sign * h * v.data[i]),
    })
    const plus = forwardWithTangent(ir, bump(1), null)
    const minus = forwardWithTangent(ir, bump(-1), null)
    for (const layer of ir.layers) {
      const got = jvp.get(layer.name)!.tangent!
      const p = plus.get(layer.name)!.value
      const m = minus.get(layer.name)!.value
      const fd = p.data.map((value, i) => (value - m.data[i]) / (2 * h))
      expect(maxAbsDiff(got.data, fd)).toBeLessThan(1e-8)
    }
  })

  it('tangent equals the value for the bias-free linear probe', async () => {
    const ir = await loadModelIR(path.join(fixtures, 'linear-probe'))
    const x = seededInput([36])
    const outputs = forwardWithTangent(ir, x, x)
    const probe = outputs.get('probe')!
    // linear map, direction = input: J x = f(x), computed by the same code path
    expect(maxAbsDiff(probe.tangent!.data, probe.value.data)).toBe(0)
  })

  it('softmax tangent sums to zero', async () => {
    const ir = await loadModelIR(path.join(fixtures, 'small-cnn'))
    const x = seededInput([6, 6, 1])
    const out = forwardWithTangent(ir, x, x).get('out')!
    const sum = out.tangent!.data.reduce((a, b) => a + b, 0)
    expect(Math.abs(sum)).toBeLessThan(1e-12)
  })
})
