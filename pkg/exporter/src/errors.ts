/** Bad spec, bad model, or bad input data; the CLI maps this to exit 1. */
export class ValidationError extends Error {
  constructor(message: string) {
    super(message)
    this.name = 'ValidationError'
  }
}
