/**
 * Binary tensor interchange writer, matching the consumer's format exactly:
 *
 *   bytes 0..3   magic "MVOV"
 *   bytes 4..7   version, uint32 LE
 *   bytes 8..11  dtype code, uint32 LE (1 = float32, 2 = uint8, 3 = int32)
 *   bytes 12..15 ndim, uint32 LE
 *   then         ndim dims as uint64 LE, then row-major LE payload
 */

import { writeFileSync } from 'fs'

export const MAGIC = 'MVOV'
export const FORMAT_VERSION = 1

export type Dtype = 'float32' | 'uint8' | 'int32'

const DTYPE_CODE: Record<Dtype, number> = { float32: 1, uint8: 2, int32: 3 }
const DTYPE_SIZE: Record<Dtype, number> = { float32: 4, uint8: 1, int32: 4 }

export function encodeTensor(data: ArrayLike<number>, dims: number[], dtype: Dtype): Buffer {
  const count = dims.reduce((a, b) => a * b, 1)
  if (data.length !== count) {
    throw new Error(`tensor payload has ${data.length} values, dims ${dims} need ${count}`)
  }
  const headerSize = 16 + 8 * dims.length
  const buf = Buffer.alloc(headerSize + count * DTYPE_SIZE[dtype])
  buf.write(MAGIC, 0, 'ascii')
  buf.writeUInt32LE(FORMAT_VERSION, 4)
  buf.writeUInt32LE(DTYPE_CODE[dtype], 8)
  buf.writeUInt32LE(dims.length, 12)
  dims.forEach((d, i) => buf.writeBigUInt64LE(BigInt(d), 16 + 8 * i))
  for (let i = 0; i < count; i++) {
    const offset = headerSize + i * DTYPE_SIZE[dtype]
    const v = data[i]
    if (dtype === 'float32') buf.writeFloatLE(v, offset)
    else if (dtype === 'int32') buf.writeInt32LE(v | 0, offset)
    else buf.writeUInt8(v & 0xff, offset)
  }
  return buf
}

export function writeTensor(path: string, data: ArrayLike<number>, dims: number[], dtype: Dtype): void {
  writeFileSync(path, encodeTensor(data, dims, dtype))
}
