/**
 * Generated from archetype PERSON.
 * Identifier: personId.
 */
public class Person {

    /** Object identifier. */
    private int personId;
    private String fullName;
}
