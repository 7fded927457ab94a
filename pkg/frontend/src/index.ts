export { extractNounPhrases } from './nounPhrases'
export { encodeTensor, writeTensor, MAGIC, FORMAT_VERSION } from './tensorFile'
export type { Dtype } from './tensorFile'
export {
  HashTextEncoder,
  SentenceCaptioner,
  TagCaptioner,
  makeCaptioner,
  maskConfidence,
} from './models'
export type { CaptionChoice, Captioner, MaskChoice, TextEncoder, VlmChoice } from './models'
export { exportScene, makeDemoCapture, lookAtCamera } from './exporter'
export type { ExportJob, RawCamera, RawCapture, RawView } from './exporter'
